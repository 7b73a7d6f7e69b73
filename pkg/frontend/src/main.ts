import { SynthesisClient } from "./api.js";
import { HistoryStore } from "./history.js";
import { mountApp } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app element");
}
mountApp(root, {
  client: new SynthesisClient(baseUrl),
  history: new HistoryStore(window.localStorage),
});
