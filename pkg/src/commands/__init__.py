"""
__init__.py file for the commands package.
"""
