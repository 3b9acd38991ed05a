"""
Backscatter SWIPT security simulator

Entry point is ``main.py``; library use goes through ``services.simulation_service.run``.
"""

__version__ = "1.0.0"
