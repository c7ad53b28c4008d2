import logging
from typing import Any, Dict, Optional

from decoders.base import AbstractDecoder
from decoders.float_mp import EdgeWeights, FloatDecoder, nms_uniform
from decoders.fxp import FxpDecoder
from decoders.graph import TannerGraph

logger = logging.getLogger(__name__)

DECODER_KINDS = ('anms', 'nms', 'spa', 'fxp')


class DecoderFactory:
    @staticmethod
    def get_decoder(kind: str, graph: TannerGraph, weights: Optional[EdgeWeights] = None,
                    config: Optional[Dict[str, Any]] = None) -> AbstractDecoder:
        """
        Build a decoder by name.

        ``nms`` ignores ``weights`` and uses the uniform ``nms_alpha`` from
        ``config`` (default 0.75); ``anms`` and ``fxp`` fall back to the same
        uniform vector when no trained weights are given.
        """
        config = config or {}
        kind = kind.lower()
        if kind == 'fxp-anms':
            kind = 'fxp'
        if kind not in DECODER_KINDS:
            raise ValueError(f"Unsupported decoder kind: {kind}")

        uniform = nms_uniform(float(config.get('nms_alpha', 0.75)), graph.num_edges)
        if kind == 'nms':
            decoder = FloatDecoder(graph, uniform, 'nms', config)
        elif kind == 'spa':
            decoder = FloatDecoder(graph, None, 'spa', config)
        else:
            if weights is None:
                logger.warning(f"No trained weights for {kind} decoder, using uniform alpha "
                               f"{uniform.alpha[0] if len(uniform) else 0.75}")
                weights = uniform
            decoder = FxpDecoder(graph, weights, config) if kind == 'fxp' \
                else FloatDecoder(graph, weights, 'anms', config)

        if not decoder.validate_config():
            raise ValueError(f"Invalid configuration for {kind} decoder")
        return decoder
