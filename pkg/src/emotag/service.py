"""HTTP service collecting emoji-emotion ratings.

The campaign fixes a seeded partition of the emoji roster into equal-size
sets; raters fetch a set (membership stable, display order re-randomized on
every request), submit one complete batch of |set| x 8 scores, and watch
their progress. Batches are all-or-nothing: the store is an append-only
JSONL file in exactly the ratings-module format, so an exported store file
and the live aggregate endpoint are computed from the same code path.
"""

import json
import os
import random
import threading
from dataclasses import dataclass
from datetime import datetime, timezone

from fastapi import FastAPI, Header, HTTPException, Query
from pydantic import BaseModel

from .corpus import EmojiInventory
from .errors import EmotagError
from .fileio import write_atomic
from .lexicon import EMOTIONS, Emotion
from .ratings import RatingSet, aggregate, krippendorff_alpha, pairwise_rater_pearson, validate_record

SCALE = {"min": 0, "max": 4}


class CampaignError(EmotagError):
    category = "campaign"


@dataclass
class Campaign:
    """Roster partition plus display names; immutable for its lifetime."""

    sets: tuple  # tuple of tuples of emoji keys
    names: dict
    seed: int

    @classmethod
    def create(cls, inventory, n_sets=6, seed=0):
        roster = inventory.keys()
        if n_sets < 1:
            raise CampaignError(f"n_sets must be >= 1, got {n_sets}")
        if len(roster) % n_sets != 0:
            raise CampaignError(
                f"roster size {len(roster)} is not divisible into {n_sets} equal sets"
            )
        shuffled = list(roster)
        random.Random(seed).shuffle(shuffled)
        size = len(shuffled) // n_sets
        sets = tuple(
            tuple(shuffled[i * size : (i + 1) * size]) for i in range(n_sets)
        )
        names = {key: inventory.name(key) for key in roster}
        return cls(sets=sets, names=names, seed=seed)

    def save(self, path):
        payload = {"seed": self.seed, "sets": [list(s) for s in self.sets], "names": self.names}
        write_atomic(path, json.dumps(payload, indent=2) + "\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
        return cls(
            sets=tuple(tuple(s) for s in payload["sets"]),
            names=dict(payload["names"]),
            seed=int(payload["seed"]),
        )

    def set_for(self, set_id):
        if not 0 <= set_id < len(self.sets):
            raise HTTPException(status_code=404, detail=f"unknown set {set_id}")
        return self.sets[set_id]


class RatingStore:
    """Append-only JSONL store; appends serialize behind one lock."""

    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()

    def append_batch(self, records):
        payload = "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(payload)
                handle.flush()
                os.fsync(handle.fileno())

    def records(self):
        if not os.path.exists(self.path):
            return []
        out = []
        with open(self.path, encoding="utf-8") as handle:
            for number, line in enumerate(handle, 1):
                if not line.strip():
                    continue
                out.append(validate_record(json.loads(line), where=f"{self.path}:{number}: "))
        return out

    def rating_set(self):
        return RatingSet(self.records())


class RatingIn(BaseModel):
    emoji: str
    emotion: str
    score: int


class SubmissionIn(BaseModel):
    rater: str
    set_id: int
    ratings: list[RatingIn]


def create_app(store, campaign=None, static_dir=None, write_token=None):
    app = FastAPI(title="emotag annotation service")
    app.state.campaign = campaign
    app.state.store = store

    def require_campaign():
        if app.state.campaign is None:
            raise HTTPException(status_code=503, detail="campaign not initialized")
        return app.state.campaign

    def check_token(token):
        if write_token is not None and token != write_token:
            raise HTTPException(status_code=401, detail="missing or wrong write token")

    @app.get("/api/campaign")
    def campaign_info():
        camp = require_campaign()
        return {
            "sets": [
                {"id": i, "size": len(s), "emojis": list(s)} for i, s in enumerate(camp.sets)
            ],
            "emotions": [e.value for e in EMOTIONS],
            "scale": SCALE,
            "names": camp.names,
        }

    @app.get("/api/sets/{set_id}")
    def set_payload(set_id: int, rater: str = Query(default="")):
        camp = require_campaign()
        members = camp.set_for(set_id)
        order = random.sample(members, len(members))
        existing = {}
        if rater:
            rated = app.state.store.rating_set().rater_scores(rater)
            members_set = set(members)
            for (emoji, emotion), score in rated.items():
                if emoji in members_set:
                    existing.setdefault(emoji, {})[emotion.value] = score
        return {
            "id": set_id,
            "emojis": order,
            "names": {key: camp.names[key] for key in members},
            "emotions": [e.value for e in EMOTIONS],
            "scale": SCALE,
            "existing": existing,
        }

    @app.post("/api/ratings")
    def submit(batch: SubmissionIn, x_annotation_token: str | None = Header(default=None)):
        check_token(x_annotation_token)
        camp = require_campaign()
        members = camp.set_for(batch.set_id)
        if not batch.rater.strip():
            raise HTTPException(status_code=422, detail="rater must be non-empty")
        members_set = set(members)
        seen = {}
        for item in batch.ratings:
            if item.emoji not in members_set:
                raise HTTPException(status_code=409, detail=f"unknown emoji {item.emoji!r} for set {batch.set_id}")
            try:
                emotion = Emotion(item.emotion)
            except ValueError:
                raise HTTPException(status_code=409, detail=f"unknown emotion {item.emotion!r}") from None
            if not SCALE["min"] <= item.score <= SCALE["max"]:
                raise HTTPException(
                    status_code=422,
                    detail=f"score {item.score} for ({item.emoji}, {emotion.value}) outside 0..4",
                )
            key = (item.emoji, emotion)
            if key in seen:
                raise HTTPException(
                    status_code=422, detail=f"duplicate cell ({item.emoji}, {emotion.value})"
                )
            seen[key] = item.score
        missing = [
            {"emoji": emoji, "emotion": emotion.value}
            for emoji in members
            for emotion in EMOTIONS
            if (emoji, emotion) not in seen
        ]
        if missing:
            raise HTTPException(
                status_code=422,
                detail={"error": "incomplete batch", "missing": missing},
            )
        ts = datetime.now(timezone.utc).isoformat()
        records = [
            {
                "rater": batch.rater,
                "emoji": emoji,
                "emotion": emotion.value,
                "score": score,
                "ts": ts,
            }
            for (emoji, emotion), score in seen.items()
        ]
        app.state.store.append_batch(records)
        return {"accepted": len(records)}

    @app.get("/api/progress/{rater}")
    def progress(rater: str):
        camp = require_campaign()
        ratings = app.state.store.rating_set()
        rated = ratings.rater_scores(rater)
        out = {}
        for i, members in enumerate(camp.sets):
            total = len(members) * len(EMOTIONS)
            done = sum(
                1
                for emoji in members
                for emotion in EMOTIONS
                if (emoji, emotion) in rated
            )
            out[str(i)] = done / total if total else 0.0
        return {"rater": rater, "sets": out}

    @app.get("/api/results/aggregate")
    def results():
        ratings = app.state.store.rating_set()
        gold = aggregate(ratings)
        gold_rows = [
            {
                "emoji": emoji,
                "emotion": emotion.value,
                "gold": cell.gold,
                "sd": cell.sd,
                "n": cell.n_raters,
            }
            for (emoji, emotion), cell in sorted(
                gold.cells.items(), key=lambda kv: (kv[0][0], kv[0][1].value)
            )
        ]
        agreement = {"pairwise_pearson_mean": None, "alpha_by_emoji": {}}
        if len(ratings.raters) >= 2:
            pairwise = pairwise_rater_pearson(ratings)
            defined = [
                v for (a, b), v in pairwise.values.items() if a < b and v is not None
            ]
            if defined:
                agreement["pairwise_pearson_mean"] = sum(defined) / len(defined)
        for emoji in ratings.emojis:
            try:
                agreement["alpha_by_emoji"][emoji] = krippendorff_alpha(ratings, emoji)
            except EmotagError:
                agreement["alpha_by_emoji"][emoji] = None
        return {"gold": gold_rows, "agreement": agreement}

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def build_service(data_dir, inventory_path=None, n_sets=6, seed=0, static_dir=None, write_token=None):
    """Assemble the app from a data directory, creating the campaign if needed."""
    os.makedirs(data_dir, exist_ok=True)
    campaign_path = os.path.join(data_dir, "campaign.json")
    store = RatingStore(os.path.join(data_dir, "ratings.jsonl"))
    if os.path.exists(campaign_path):
        campaign = Campaign.load(campaign_path)
    elif inventory_path:
        campaign = Campaign.create(EmojiInventory.load(inventory_path), n_sets=n_sets, seed=seed)
        campaign.save(campaign_path)
    else:
        campaign = None
    return create_app(store, campaign=campaign, static_dir=static_dir, write_token=write_token)
