"""Secrecy outage toolkit for correlated Malaga free-space optical links"""
__version__ = "0.1.0"
