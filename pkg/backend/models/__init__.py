"""
Pydantic models package.
"""
