#!/usr/bin/env python3
"""
Run archive database initialization script
"""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from utils.config import config
from utils.database import db_manager
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

def init_database():
    """Create the run archive tables"""
    try:
        # Test connection first
        if not db_manager.test_connection():
            logger.error(f"Database connection failed: {config.DATABASE_URL}")
            return False

        db_manager.create_tables()
        logger.info("Run archive initialized successfully!")
        return True

    except Exception as e:
        logger.error(f"Database initialization failed: {e}")
        return False

if __name__ == "__main__":
    print(f"Initializing run archive at {config.DATABASE_URL}...")
    success = init_database()
    if success:
        print("✓ Run archive initialized successfully!")
    else:
        print("✗ Run archive initialization failed!")
        sys.exit(1)
