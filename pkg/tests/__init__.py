"""
Test Suite für WorldGrow
"""
