# Author: Green Mountain Systems AI Inc.
# Donated to IAB Tech Lab

"""Tests for the Ad Buyer System."""
