# Scenario, report and run-archive models
