/** Browser entry point: mount the app against the service base URL.
 *
 * The URL comes from the ?api= query parameter, defaulting to the service's
 * standard local bind.
 */

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const DEFAULT_BASE = "http://127.0.0.1:8351";

export function mount(root: HTMLElement, baseUrl?: string): App {
  const params = new URLSearchParams(root.ownerDocument.defaultView?.location.search ?? "");
  const base = baseUrl ?? params.get("api") ?? DEFAULT_BASE;
  return new App(root, new ApiClient(base));
}

const rootNode = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootNode !== null) {
  mount(rootNode);
}
