#!/usr/bin/env python
"""
Главная точка входа приложения Mapflow Hub.

Запуск команд:
    python main.py generate --seed 7 --out scenario.json
    python main.py generate --vehicles 50 --demand 150G --out small.json
    python main.py run scenario.json etdm --out report.csv --detail vehicles.csv
    python main.py run scenario.json pta:0.7
    python main.py sweep-volume scenario.json --from 140G --to 300G --step 10G
    python main.py sweep-traffic scenario.json --from 10 --to 250 --workers 4
    python main.py feasibility --range 100 --offset 60 --v1 20 --v2 20
"""
import sys

from mapflow_hub.cli.interface import main

if __name__ == "__main__":
    sys.exit(main())
