"""
Quorum Lab - Source Module
"""
