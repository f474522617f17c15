"""Command line front-end (``python -m src.cli.main``)."""
