/** Browser entry point: preset picker, seed box, and the card table. */

import { ApiClient } from "./api.js";
import { createTable } from "./table.js";

const PRESETS: Record<string, { group: string; label: string }> = {
  kac_paljutkin: { group: "kac_paljutkin", label: "Kac-Paljutkin (4 cards)" },
  "dual-s3": { group: "dual-s3", label: "dual S3 (4 cards)" },
  s4: { group: "s4", label: "classical S4 (4 cards)" },
};

function start(): void {
  const app = document.getElementById("app");
  if (app === null) return;

  const controls = document.createElement("div");
  controls.className = "controls";

  const picker = document.createElement("select");
  picker.id = "preset";
  for (const [value, preset] of Object.entries(PRESETS)) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = preset.label;
    picker.appendChild(option);
  }

  const seedBox = document.createElement("input");
  seedBox.id = "seed";
  seedBox.type = "number";
  seedBox.value = "7";

  const dealButton = document.createElement("button");
  dealButton.id = "deal";
  dealButton.textContent = "shuffle & deal";

  const resetButton = document.createElement("button");
  resetButton.id = "reset";
  resetButton.textContent = "reset";

  const status = document.createElement("span");
  status.id = "status";

  controls.append(picker, seedBox, dealButton, resetButton, status);

  const tableRoot = document.createElement("div");
  tableRoot.id = "table";
  app.replaceChildren(controls, tableRoot);

  const controller = createTable(tableRoot, new ApiClient(""));

  dealButton.addEventListener("click", () => {
    const preset = PRESETS[picker.value];
    status.textContent = "dealing...";
    controller
      .newTable(preset.group, { kind: "haar" }, Number(seedBox.value))
      .then(() => {
        status.textContent = `session ready (seed ${seedBox.value})`;
      })
      .catch((error) => {
        status.textContent = `error: ${error instanceof Error ? error.message : error}`;
      });
  });

  resetButton.addEventListener("click", () => {
    controller
      .reset()
      .then(() => {
        status.textContent = "reset to the initial state";
      })
      .catch((error) => {
        status.textContent = `error: ${error instanceof Error ? error.message : error}`;
      });
  });
}

if (document.readyState === "loading") {
  document.addEventListener("DOMContentLoaded", start);
} else {
  start();
}
