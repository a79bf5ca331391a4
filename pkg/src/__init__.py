"""
__init__.py file for the src package.
"""
