# -*- coding: utf-8 -*-
"""Vekua-type operators on tori in Denjoy-Carleman classes."""
from torusvekua.cli import run

if __name__ == "__main__":
    run()
