"""
Configuration management for the backscatter security simulator
"""
import os
from pathlib import Path
from typing import List

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

_REPO_ROOT = Path(__file__).resolve().parent.parent


class Config:
    """Operational settings; physics parameters come from scenario files only"""

    # Output Configuration
    OUTPUT_DIR = os.getenv('SWIPT_OUTPUT_DIR', './reports')
    DEFAULT_REPORT_FORMAT = os.getenv('SWIPT_REPORT_FORMAT', 'json')
    REPORT_RETENTION_DAYS = int(os.getenv('SWIPT_REPORT_RETENTION_DAYS', '30'))

    # Scenario presets
    PRESETS_DIR = os.getenv('SWIPT_PRESETS_DIR', str(_REPO_ROOT / 'scenarios'))

    # Database Configuration (run archive)
    DATABASE_URL = os.getenv('DATABASE_URL', 'sqlite:///./swipt_runs.db')

    # Sweep Configuration
    SWEEP_WORKERS = int(os.getenv('SWIPT_SWEEP_WORKERS', '4'))

    # Logging Configuration
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'WARNING')
    LOG_FILE = os.getenv('LOG_FILE', '')

    SUPPORTED_REPORT_FORMATS = ['json', 'csv']

    @classmethod
    def get_output_dir(cls) -> Path:
        return Path(cls.OUTPUT_DIR)

    @classmethod
    def get_presets_dir(cls) -> Path:
        return Path(cls.PRESETS_DIR)

    @classmethod
    def validate_config(cls) -> List[str]:
        """Validate configuration and return list of errors"""
        errors = []

        if not cls.OUTPUT_DIR:
            errors.append("SWIPT_OUTPUT_DIR must not be empty")

        if cls.DEFAULT_REPORT_FORMAT not in cls.SUPPORTED_REPORT_FORMATS:
            errors.append(f"SWIPT_REPORT_FORMAT must be one of {cls.SUPPORTED_REPORT_FORMATS}")

        if cls.SWEEP_WORKERS <= 0:
            errors.append("SWIPT_SWEEP_WORKERS must be positive")

        if cls.REPORT_RETENTION_DAYS < 0:
            errors.append("SWIPT_REPORT_RETENTION_DAYS must be non-negative")

        if not cls.DATABASE_URL:
            errors.append("DATABASE_URL is required")

        return errors


# Global config instance
config = Config()
