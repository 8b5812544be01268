/** Browser entry point. Mounts the app when the host page has an
 * #app element; importing this module from tests is a no-op. */

import { createApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const base =
    (window as unknown as { ARGUS_API?: string }).ARGUS_API ?? "";
  createApp(root, base);
}
