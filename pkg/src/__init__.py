"""Source Package"""
