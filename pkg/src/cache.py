import json
import logging
import os

import aiofiles
import aiofiles.os

import constants

logger = logging.getLogger(__name__)


def cache_path(N: int, prec: int) -> str:
    return os.path.join(constants.cache_dir(), f"values_N{N}_prec{prec}.json")


async def load_values(N: int, prec: int) -> dict:
    filepath = cache_path(N, prec)
    if not await aiofiles.os.path.isfile(filepath):
        return {}
    async with aiofiles.open(file=filepath, mode="r", encoding="utf-8") as f:
        content = await f.read()
    try:
        data = json.loads(content)
    except json.JSONDecodeError:
        logger.warning("Ignoring unreadable cache file %s", filepath)
        return {}
    if data.get("schema_version") != constants.SCHEMA_VERSION:
        return {}
    return data.get("values", {})


async def store_values(N: int, prec: int, values: dict):
    """Merges values into the cache file for (N, prec)"""
    directory = constants.cache_dir()
    if not await aiofiles.os.path.exists(directory):
        os.makedirs(directory, exist_ok=True)

    merged = await load_values(N, prec)
    merged.update(values)
    payload = {"schema_version": constants.SCHEMA_VERSION, "N": N, "prec": prec, "values": merged}
    async with aiofiles.open(file=cache_path(N, prec), mode="w", encoding="utf-8") as f:
        await f.write(json.dumps(payload, sort_keys=True))
