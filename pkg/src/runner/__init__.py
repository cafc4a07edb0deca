"""Sweep orchestration."""

from src.runner.sweep_runner import SweepRunner, disparity_point, tradeoff_point

__all__ = ['SweepRunner', 'disparity_point', 'tradeoff_point']
