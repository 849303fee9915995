"""Addressable pairing heap keyed by Visits pairs.

A heap is represented by its root ``Node`` (``None`` when empty).  Keys are
``(birthday, visits, state)`` tuples; a birthday of ``-1`` stands for
"no candidate", so it sorts before every real birthday.
"""
from __future__ import annotations


class Node:
    __slots__ = ("state", "key", "child", "sibling", "prev")

    def __init__(self, state, birthday=-1, visits=0):
        self.state = state
        self.key = (birthday, visits, state)
        self.child = None
        self.sibling = None
        self.prev = None  # parent if first child, else left sibling

    def __repr__(self):
        return f"Node({self.state}, b={self.key[0]}, v={self.key[1]})"


def meld(a: Node | None, b: Node | None) -> Node | None:
    if a is None:
        return b
    if b is None:
        return a
    if b.key < a.key:
        a, b = b, a
    first = a.child
    b.sibling = first
    b.prev = a
    if first is not None:
        first.prev = b
    a.child = b
    return a


def _merge_pairs(first: Node | None) -> Node | None:
    """Two-pass combine of a sibling list into a single heap."""
    if first is None:
        return None
    pairs = []
    node = first
    while node is not None:
        a = node
        b = a.sibling
        node = b.sibling if b is not None else None
        a.sibling = a.prev = None
        if b is not None:
            b.sibling = b.prev = None
        pairs.append(meld(a, b))
    root = pairs.pop()
    while pairs:
        root = meld(pairs.pop(), root)
    return root


def delete_min(root: Node) -> Node | None:
    rest = _merge_pairs(root.child)
    root.child = None
    return rest


def _detach(node: Node):
    prev = node.prev
    if prev.child is node:
        prev.child = node.sibling
    else:
        prev.sibling = node.sibling
    if node.sibling is not None:
        node.sibling.prev = prev
    node.sibling = node.prev = None


def set_key(root: Node, node: Node, birthday: int, visits: int) -> Node:
    """Raise the key of ``node`` (which lives in the heap ``root``); return the new root."""
    key = (birthday, visits, node.state)
    if key < node.key:
        raise ValueError("set_key may only increase a key")
    if node is root:
        rest = delete_min(root)
    else:
        _detach(node)
        rest = meld(root, _merge_pairs(node.child))
        node.child = None
    node.key = key
    return meld(rest, node)


def iter_nodes(root: Node | None):
    stack = [root] if root is not None else []
    while stack:
        node = stack.pop()
        yield node
        if node.sibling is not None:
            stack.append(node.sibling)
        if node.child is not None:
            stack.append(node.child)
