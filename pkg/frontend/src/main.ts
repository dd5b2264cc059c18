import "./style.css";
import { App } from "./app";

const root = document.querySelector<HTMLDivElement>("#app");
if (!root) {
  throw new Error("root element #app not found");
}

const app = new App(root);
(window as unknown as { qndk: App }).qndk = app;
