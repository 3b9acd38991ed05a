# Configuration, logging and database utilities
