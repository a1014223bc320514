#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""Tests for the package."""
