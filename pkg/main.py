"""Secrecy FSO Toolkit - Main Entry Point"""
import sys

from src.cli import run


if __name__ == "__main__":
    sys.exit(run())
