"""Natural-language properties grounded into verification queries."""

import json

from ._semground import Network, SemgroundError, ibp, load_network, network_from_json
from . import _semground

__all__ = ["Network", "SemgroundError", "ibp", "load_network", "network_from_json", "verify", "emit_vnnlib", "parse"]


def verify(net, spec, max_nodes=None):
    """Verdict dict for a grounded spec (dict or JSON text)."""
    text = spec if isinstance(spec, str) else json.dumps(spec)
    if max_nodes is None:
        return json.loads(_semground._verify(net, text))
    return json.loads(_semground._verify(net, text, max_nodes))


def emit_vnnlib(spec, net):
    text = spec if isinstance(spec, str) else json.dumps(spec)
    return _semground._emit_vnnlib(text, net)


def parse(text, domain="image", mode="detailed", lexicon="", schema=""):
    """Rule-based parse. Returns {spec, raw_response, latency, backend, mode}."""
    return json.loads(_semground._parse_rules(text, domain, mode, str(lexicon), str(schema)))
