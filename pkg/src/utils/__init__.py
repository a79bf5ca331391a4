"""
__init__.py file for the utils package.
"""
