"""Built-in schema registries.

``simple``, ``medium`` and ``complex`` match the three evaluation contexts
of increasing complexity; ``demo`` matches the single-room rig used by the
live demo (a color light group speaking the bridge dialect plus a smart
plug powering a stereo).
"""

from __future__ import annotations

from .context import SchemaRegistry

_SWITCH = {"kind": "switch"}


def simple_registry() -> SchemaRegistry:
    """Lights that are only on or off."""
    return SchemaRegistry.from_document({"lights": {"state": _SWITCH}})


def medium_registry() -> SchemaRegistry:
    """Lights with on/off plus r/g/b color channels in [0, 255]."""
    return SchemaRegistry.from_document(
        {
            "lights": {
                "state": _SWITCH,
                "r": {"kind": "integer", "min": 0, "max": 255},
                "g": {"kind": "integer", "min": 0, "max": 255},
                "b": {"kind": "integer", "min": 0, "max": 255},
            }
        }
    )


def complex_registry() -> SchemaRegistry:
    """Color lights plus TVs and smart speakers with on/off and volume."""
    media = {
        "state": _SWITCH,
        "volume": {"kind": "integer", "min": 0, "max": 100},
    }
    doc = medium_registry().to_document()
    doc["tvs"] = media
    doc["speakers"] = dict(media)
    return SchemaRegistry.from_document(doc)


def demo_registry() -> SchemaRegistry:
    """The live-demo rig: a light group (on/brightness/effect) and smart plugs."""
    return SchemaRegistry.from_document(
        {
            "lights": {
                "state": _SWITCH,
                "brightness": {"kind": "integer", "min": 0, "max": 254},
                "effect": {"kind": "text", "allowed": ["none", "colorloop"]},
            },
            "plugs": {"state": _SWITCH},
        }
    )


BUILTIN_REGISTRIES = {
    "simple": simple_registry,
    "medium": medium_registry,
    "complex": complex_registry,
    "demo": demo_registry,
}


def builtin_registry(name: str) -> SchemaRegistry:
    try:
        factory = BUILTIN_REGISTRIES[name]
    except KeyError:
        raise KeyError(
            f"unknown registry {name!r}; built-ins: {sorted(BUILTIN_REGISTRIES)}"
        ) from None
    return factory()
