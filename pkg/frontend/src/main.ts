import { boot } from "./app.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
// Served by the viewer service itself by default; override with
// <body data-base-url="..."> for a detached dev setup.
const baseUrl = document.body.dataset.baseUrl ?? window.location.origin;
void boot(root, { baseUrl });
