"""Configuration module for the crossbar toolkit."""
