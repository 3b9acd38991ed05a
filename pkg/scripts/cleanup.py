#!/usr/bin/env python3
"""
Cleanup script for old simulation reports
"""
import sys
from pathlib import Path

# Add parent directory to path
sys.path.append(str(Path(__file__).parent.parent))

from services.file_manager import FileManager
from utils.config import config
import logging

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

def cleanup_old_reports(days_to_keep=config.REPORT_RETENTION_DAYS):
    """Delete reports older than days_to_keep"""
    try:
        file_manager = FileManager()

        print(f"Cleaning up reports older than {days_to_keep} days in {file_manager.base_path}...")
        deleted_count = file_manager.cleanup_old_reports(days_to_keep)

        if deleted_count > 0:
            print(f"✓ Cleaned up {deleted_count} old report(s)")
        else:
            print("✓ No old reports to clean up")

        return True

    except Exception as e:
        print(f"✗ Cleanup error: {e}")
        return False

def show_storage_stats():
    """Show output-directory statistics"""
    try:
        stats = FileManager().get_storage_stats()

        print("\nStorage Statistics:")
        print(f"JSON Reports: {stats['json_reports']}")
        print(f"CSV Report Directories: {stats['csv_directories']}")
        print(f"Total Files: {stats['total_files']}")
        print(f"Total Size: {stats['total_size'] / (1024*1024):.2f} MB")

        return True

    except Exception as e:
        print(f"✗ Error getting storage stats: {e}")
        return False

if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Clean up old reports and show storage stats")
    parser.add_argument("--days", type=int, default=config.REPORT_RETENTION_DAYS, help="Days to keep reports")
    parser.add_argument("--stats", action="store_true", help="Show storage statistics")
    parser.add_argument("--cleanup", action="store_true", help="Clean up old reports")

    args = parser.parse_args()

    if args.stats:
        show_storage_stats()

    if args.cleanup:
        cleanup_old_reports(args.days)

    if not args.stats and not args.cleanup:
        # Default: show stats and cleanup
        show_storage_stats()
        cleanup_old_reports(args.days)
