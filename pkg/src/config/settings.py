"""Global application settings loaded from environment variables."""

import os
from pathlib import Path
from dotenv import load_dotenv

PROJECT_ROOT = Path(__file__).parent.parent.parent

# Load environment variables from .env file
env_path = PROJECT_ROOT / '.env'
load_dotenv(dotenv_path=env_path)

# Technology / crossbar configuration file used when --config is not given
DEFAULT_CONFIG_PATH = os.getenv('XBAR_CONFIG', str(PROJECT_ROOT / 'config' / 'technology.toml'))

# Where commands write their CSV/JSON outputs
DEFAULT_OUTPUT_DIR = os.getenv('XBAR_OUTPUT_DIR', 'results')

# Sweep concurrency
DEFAULT_JOBS = int(os.getenv('XBAR_JOBS', '1'))

LOG_LEVEL = os.getenv('XBAR_LOG_LEVEL', 'INFO')
