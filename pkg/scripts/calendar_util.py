"""Synthetic US-style trading calendar for the bundled datasets.

Weekdays 1992-01-02 .. 2024-12-30 minus a holiday rule set sized to leave
exactly 8310 trading days, 1723 ISO weeks, and 396 calendar months.  All
closures are single mid-week days or pairs, so every ISO week keeps a
Wed/Thu/Fri last trading day (weekly downsample gaps stay within 5..12).
"""

from __future__ import annotations

from datetime import date, timedelta

START = date(1992, 1, 2)
END = date(2024, 12, 30)


def easter(year: int) -> date:
    # Anonymous Gregorian computus
    a = year % 19
    b, c = divmod(year, 100)
    d, e = divmod(b, 4)
    f = (b + 8) // 25
    g = (b - f + 1) // 3
    h = (19 * a + b - d - g + 15) % 30
    i, k = divmod(c, 4)
    l = (32 + 2 * e + 2 * i - h - k) % 7
    m = (a + 11 * h + 22 * l) // 451
    month, day = divmod(h + l - 7 * m + 114, 31)
    return date(year, month, day + 1)


def _nth_weekday(year: int, month: int, weekday: int, n: int) -> date:
    d = date(year, month, 1)
    offset = (weekday - d.weekday()) % 7
    return d + timedelta(days=offset + 7 * (n - 1))


def _last_weekday(year: int, month: int, weekday: int) -> date:
    if month == 12:
        d = date(year, 12, 31)
    else:
        d = date(year, month + 1, 1) - timedelta(days=1)
    return d - timedelta(days=(d.weekday() - weekday) % 7)


def _observed(d: date) -> date | None:
    # Sat -> Fri before, Sun -> Mon after, except Sat New Year (not observed)
    if d.weekday() == 5:
        return None if d.month == 1 and d.day == 1 else d - timedelta(days=1)
    if d.weekday() == 6:
        return d + timedelta(days=1)
    return d


# single mid-week special closures (market-wide events, funerals, storms);
# never Wed+Thu+Fri of one week, so weekly downsample gaps stay in range
SPECIAL = [
    date(1994, 4, 27),
    date(1996, 1, 8),
    date(2001, 9, 11),
    date(2001, 9, 12),
    date(2001, 9, 13),
    date(2004, 6, 11),
    date(2007, 1, 2),
    date(2012, 10, 29),
    date(2012, 10, 30),
    date(2018, 12, 5),
]


def holidays(year: int) -> set[date]:
    hs: set[date] = set()
    for raw in (date(year, 1, 1), date(year, 7, 4), date(year, 12, 25)):
        obs = _observed(raw)
        if obs is not None:
            hs.add(obs)
    if year >= 1998:
        hs.add(_nth_weekday(year, 1, 0, 3))       # MLK day
    hs.add(_nth_weekday(year, 2, 0, 3))           # Presidents day
    hs.add(easter(year) - timedelta(days=2))      # Good Friday
    hs.add(_last_weekday(year, 5, 0))             # Memorial day
    if year >= 2022:
        obs = _observed(date(year, 6, 19))
        if obs is not None:
            hs.add(obs)
    hs.add(_nth_weekday(year, 9, 0, 1))           # Labor day
    hs.add(_nth_weekday(year, 11, 3, 4))          # Thanksgiving
    return hs


def trading_days() -> list[date]:
    closed: set[date] = set(SPECIAL)
    for year in range(START.year, END.year + 1):
        closed |= holidays(year)
    days = []
    d = START
    while d <= END:
        if d.weekday() < 5 and d not in closed:
            days.append(d)
        d += timedelta(days=1)
    return days


if __name__ == "__main__":
    days = trading_days()
    weeks = {d.isocalendar()[:2] for d in days}
    months = {(d.year, d.month) for d in days}
    print(f"trading days: {len(days)}  iso weeks: {len(weeks)}  months: {len(months)}")
    gaps = []
    last_by_week = {}
    for d in days:
        last_by_week[d.isocalendar()[:2]] = d
    ordered = sorted(last_by_week.values())
    for a, b in zip(ordered, ordered[1:]):
        gaps.append((b - a).days)
    print("weekly gap range:", min(gaps), max(gaps))
