/** Minimal DOM construction helpers; no framework. */

export type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: Element): void {
  while (node.firstChild) {
    node.removeChild(node.firstChild);
  }
}

/** Query that throws when the node is missing, so tests fail with a message
 * instead of a null dereference. */
export function must<T extends Element>(root: ParentNode, selector: string): T {
  const node = root.querySelector(selector);
  if (node === null) {
    throw new Error(`missing element ${selector}`);
  }
  return node as T;
}
