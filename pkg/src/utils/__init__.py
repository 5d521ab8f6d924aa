"""Utils Package"""
from .config import config, Config, RunConfig, load_run_config, worker_count
from .logger import setup_logger

__all__ = ['config', 'Config', 'RunConfig', 'load_run_config', 'worker_count', 'setup_logger']
