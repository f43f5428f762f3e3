from typing import Any, Callable


class SingletonManager:
    """
    A lightweight per-process registry for shared, read-only objects.

    Used for design matrices that depend only on geometry (kernel and basis
    matrices on a fixed grid), so replications in the same process reuse them.
    Stored values must never be mutated by callers.
    """

    _instances = {}

    @classmethod
    def get(cls, key: str, default=None):
        """
        Get the value of a singleton variable by key.

        Args:
            key (str): The key of the singleton variable.
            default (Any): The value to return if the key does not exist.

        Returns:
            Any: The stored value, or the default value if the key does not exist.
        """
        return cls._instances.get(key, default)

    @classmethod
    def set(cls, key: str, value):
        """
        Set the value of a singleton variable.

        Raises:
            ValueError: If the key is empty.
        """
        if not key:
            raise ValueError("Key cannot be empty.")
        cls._instances[key] = value

    @classmethod
    def get_or_create(cls, key: str, factory: Callable[[], Any]):
        """
        Return the value stored under key, building it with factory() on first use.
        """
        if not key:
            raise ValueError("Key cannot be empty.")
        if key not in cls._instances:
            cls._instances[key] = factory()
        return cls._instances[key]

    @classmethod
    def reset(cls):
        """Clear all stored keys and their values."""
        cls._instances.clear()

    @classmethod
    def reset_key(cls, key: str):
        """
        Remove a specific key.

        Raises:
            KeyError: If the key does not exist.
        """
        if key not in cls._instances:
            raise KeyError(f"Key '{key}' not found in SingletonManager.")
        cls._instances.pop(key)

    @classmethod
    def keys(cls):
        """List of all keys currently stored."""
        return list(cls._instances.keys())
