from pathlib import Path

APP_NAME = "zoomlens"
VERSION = "0.1.0"
SETTINGS_FILE_NAME = "settings.toml"
CHECKPOINT_MAGIC = "ZLT1"
CHECKPOINT_EXTENSION = "zlt"
MANIFEST_FILE_NAME = "manifest.json"
THREADS_ENV_VAR = "ZOOMLENS_THREADS"
GRADES = (0, 1, 2, 3, 4)
LEVEL_COUNT = len(GRADES)
DEFAULT_OUTPUT_PATH = Path("zoomlens-out")
LOG_FILE_NAME = "log.txt"
DATA_DIR_ENV_VAR = "ZOOMLENS_DATA_DIR"
TRACE = 5
