#!/usr/bin/env python3
"""
Convex-frontier market tool

Entry script for running the command-line interface from a checkout:

    python main.py frontier listings.csv
    python main.py shares listings.csv --cdf cdf.json
    python main.py estimate history.csv --out cdf.json
    python main.py price competitors.csv --rep 4.2 --ceiling 1.0 --svg profit.svg
    python main.py validate listings.csv --rep 4.2

Settings can also come from a .env file (see .env.example).
"""

from dotenv import load_dotenv

from convexprice.cli import app

if __name__ == "__main__":
    load_dotenv()
    app()
