"""Test suite for the qmac-capacity toolkit."""
