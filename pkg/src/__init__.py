"""Design-technology co-exploration toolkit for NVM crossbar inference hardware."""

__version__ = "0.1.0"
