"""
__init__.py file for the models package.
"""
