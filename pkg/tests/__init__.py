"""Test suite for the radialdpp package."""
