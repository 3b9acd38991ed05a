# Scenario loading, simulation, report emission and run archive
