import os
import threading
import logging
import atexit
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from functools import wraps
from typing import Any, Callable, Dict, Iterable, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel

load_dotenv()

logger = logging.getLogger(__name__)

# Pool de hilos global para las convoluciones por capa
worker_pool = None
pool_lock = threading.Lock()

# Configuración desde variables de entorno
RUN_CONFIG = {
    'threads': int(os.getenv("NLS_THREADS", str(os.cpu_count() or 1))),
    'cache_entries': int(os.getenv("NLS_CACHE_ENTRIES", "8")),
    'fft_threshold': int(os.getenv("NLS_FFT_THRESHOLD", "150")),
    'parallel_min_length': int(os.getenv("NLS_PARALLEL_MIN_LENGTH", "2048")),
    'log_level': os.getenv("NLS_LOG_LEVEL", "INFO"),
}


class RunConfig(BaseModel):
    """Configuración resuelta de una ejecución; se copia en cada salida"""

    command: str
    flags: Dict[str, Any]
    config_file: Optional[str] = None
    threads: int
    output: Optional[str] = None

# ================================
# POOL DE HILOS
# ================================

def init_worker_pool():
    """Inicializar el pool de hilos (una sola vez por proceso)"""
    global worker_pool

    if worker_pool is not None:
        return

    with pool_lock:
        if worker_pool is not None:
            return
        threads = max(1, RUN_CONFIG['threads'])
        logger.info(f"Inicializando pool de hilos: threads={threads}")
        worker_pool = ThreadPoolExecutor(max_workers=threads, thread_name_prefix="nlsplus")


def set_threads(threads: Optional[int]):
    """Fijar el número de hilos; reinicia el pool si ya existía"""
    global worker_pool
    if threads is None:
        return
    if threads < 1:
        raise ValueError(f"El número de hilos debe ser ≥ 1 (recibido {threads})")
    with pool_lock:
        if worker_pool is not None and RUN_CONFIG['threads'] != threads:
            worker_pool.shutdown(wait=True)
            worker_pool = None
        RUN_CONFIG['threads'] = threads


def parallel_map(func: Callable, items: Iterable) -> List:
    """map ordenado: el resultado no depende del número de hilos"""
    items = list(items)
    if RUN_CONFIG['threads'] <= 1 or len(items) < 2:
        return [func(item) for item in items]
    if worker_pool is None:
        init_worker_pool()
    return list(worker_pool.map(func, items))


def get_pool_status():
    """Estado del pool para los reportes"""
    return {
        "status": "initialized" if worker_pool is not None else "not_initialized",
        "threads": RUN_CONFIG['threads'],
        "pool_type": "ThreadPoolExecutor",
    }

# ================================
# CACHE DE COEFICIENTES
# ================================

class CoefficientCache:
    """Cache en memoria (LRU) para c̃ = c(1,1) y otros resultados deterministas"""

    def __init__(self, max_entries=8):
        self.cache = OrderedDict()
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def get(self, key):
        with self._lock:
            if key in self.cache:
                self.cache.move_to_end(key)
                self.hits += 1
                return self.cache[key]
            self.misses += 1
            return None

    def set(self, key, value):
        with self._lock:
            self.cache[key] = value
            self.cache.move_to_end(key)
            while len(self.cache) > self.max_entries:
                evicted, _ = self.cache.popitem(last=False)
                logger.debug(f"Cache lleno, descartando {evicted}")

    def clear(self):
        with self._lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0

    def get_stats(self):
        with self._lock:
            return {
                "entries": len(self.cache),
                "max_entries": self.max_entries,
                "hits": self.hits,
                "misses": self.misses,
            }

# Instancia global de cache
coefficient_cache = CoefficientCache(max_entries=RUN_CONFIG['cache_entries'])


def cached_coefficients(key):
    """Decorador para cachear resultados por argumentos (deben ser hashables)"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            cache_key = (key, args, tuple(sorted(kwargs.items())))

            cached_result = coefficient_cache.get(cache_key)
            if cached_result is not None:
                logger.debug(f"Cache hit para {key}{args}")
                return cached_result

            result = func(*args, **kwargs)
            coefficient_cache.set(cache_key, result)
            logger.debug(f"Cache set para {key}{args}")

            return result
        return wrapper
    return decorator

# ================================
# FUNCIONES DE LIMPIEZA
# ================================

def cleanup_pool():
    """Cerrar el pool de hilos al finalizar"""
    global worker_pool
    if worker_pool is not None:
        try:
            worker_pool.shutdown(wait=False, cancel_futures=True)
            worker_pool = None
            logger.debug("Pool de hilos cerrado correctamente")
        except Exception as e:
            logger.error(f"Error cerrando pool: {e}")


def cleanup_cache():
    """Limpiar cache al finalizar"""
    try:
        coefficient_cache.clear()
    except Exception as e:
        logger.error(f"Error limpiando cache: {e}")


atexit.register(cleanup_pool)
atexit.register(cleanup_cache)
