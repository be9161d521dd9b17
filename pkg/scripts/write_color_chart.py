#!/usr/bin/env python3
"""
Write the built-in 122-chip color chart as a chart CSV.

Usage:
    scripts/write_color_chart.py chart.csv

Edit the CSV and pass it to ``ibx domain --kind color --chart chart.csv``
to experiment with other charts.
"""
import sys

from ibx.domains import default_color_chart, load_color_chart, write_color_chart


def write(tofile):
    print("Building chart...")
    chart = default_color_chart()
    print("Writing {} colors...".format(len(chart)))
    write_color_chart(tofile, chart)
    assert load_color_chart(tofile) == chart
    print("Done!")


if __name__ == "__main__":
    write(sys.argv[1])
