from functools import wraps
from typing import Any, Callable, Dict, Optional


class Cache:
    """进程内缓存, 存放不可变的计算结果"""

    def __init__(self, capacity: int = 512):
        self.capacity = capacity
        self._data: Dict[Any, Any] = {}

    def get(self, key: Any) -> Optional[Any]:
        return self._data.get(key)

    def set(self, key: Any, value: Any) -> bool:
        if len(self._data) >= self.capacity:
            # 淘汰最早的条目
            self._data.pop(next(iter(self._data)))
        self._data[key] = value
        return True


_default_cache = Cache()


def cached(key: Callable[..., Any], cache: Cache = None):
    """
    纯函数记忆化; key 把调用参数映射为可哈希的键。
    键中保留输入对象本身, 以保证按身份比较的键有效。
    """
    store = cache if cache is not None else _default_cache

    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            cache_key = (func.__name__, key(*args, **kwargs))
            result = store.get(cache_key)
            if result is not None:
                return result
            result = func(*args, **kwargs)
            store.set(cache_key, result)
            return result
        wrapper.cache = store
        return wrapper
    return decorator
