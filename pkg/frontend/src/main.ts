import { ApiClient } from "./api.js";
import { Controller } from "./state.js";
import { mount } from "./ui.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");
const controller = new Controller(new ApiClient(""));
mount(root, controller);
void controller.init();
