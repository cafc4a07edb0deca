"""Test package for the crossbar endurance explorer."""
