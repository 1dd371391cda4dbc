#!/usr/bin/env python3
"""Regenerates the format-identical dataset fixtures in this directory.

ml1m_fixture.dat   -- MovieLens-1M layout, 6040 users, 3706 rated movies
ldos_fixture.csv   -- LDOS-CoMoDa layout, 121 users, 1232 items
"""
import pathlib

HERE = pathlib.Path(__file__).resolve().parent


def ml1m():
    # MovieLens-1M movie ids run 1..3952 but only 3706 of them are rated.
    unrated = set(range(17, 3953, 16)[:246])
    movies = [i for i in range(1, 3953) if i not in unrated]
    assert len(movies) == 3706
    lines = []
    for k in range(8000):
        user = k % 6040 + 1
        movie = movies[(k * 7) % 3706]
        rating = (k * 13) % 5 + 1
        lines.append(f"{user}::{movie}::{rating}::{978300760 + k}")
    (HERE / "ml1m_fixture.dat").write_text("\n".join(lines) + "\n")


def ldos():
    header = ("userID,itemID,rating,age,sex,city,country,time,daytype,season,location,"
              "weather,social,endEmo,dominantEmo,mood,physical,decision,interaction")
    rows = [header]
    for k in range(2296):
        user = 1000 + k % 121
        item = 1 + (k * 5) % 1232
        rating = (k * 3) % 5 + 1
        ctx = [20 + k % 40, 1 + k % 2, k % 30, 1 + k % 5, 1 + k % 4, 1 + k % 3, 1 + k % 4,
               1 + k % 3, 1 + k % 5, 1 + k % 4, 1 + k % 7, 1 + k % 7, 1 + k % 3, 1 + k % 2,
               1 + k % 2, 1 + k % 2]
        rows.append(",".join(str(x) for x in [user, item, rating] + ctx))
    (HERE / "ldos_fixture.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    ml1m()
    ldos()
