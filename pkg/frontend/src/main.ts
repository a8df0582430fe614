/** Browser entry point: upload → run → overlay toggles → click-to-trace.
 *
 * The page serves directly from the pipeline service (`--frontend` flag),
 * so all API calls are same-origin.
 */

import { Client, ServiceError } from "./api.js";
import { TraceController } from "./controller.js";
import { renderErrorToast } from "./render.js";
import { imageToCanvas, ViewerState } from "./state.js";

function fileToBase64(file: File): Promise<string> {
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => {
      const url = reader.result as string;
      resolve(url.slice(url.indexOf(",") + 1));
    };
    reader.onerror = () => reject(reader.error);
    reader.readAsDataURL(file);
  });
}

export function setupViewer(doc: Document): void {
  const canvas = doc.getElementById("view") as HTMLCanvasElement;
  const ctx = canvas.getContext("2d")!;
  const fileInput = doc.getElementById("file") as HTMLInputElement;
  const toggles = doc.getElementById("toggles")!;
  const panel = doc.getElementById("measurements")!;
  const toasts = doc.getElementById("toasts")!;

  const state = new ViewerState();
  const client = new Client("");
  const controller = new TraceController(state, client, panel, doc);
  const stageImages = new Map<string, HTMLImageElement>();
  let baseImage: HTMLImageElement | null = null;

  function redraw(): void {
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    const t = state.transform;
    if (baseImage !== null) {
      ctx.imageSmoothingEnabled = false;
      ctx.drawImage(baseImage, t.panX, t.panY,
        baseImage.width * t.zoom, baseImage.height * t.zoom);
    }
    for (const name of state.activeOverlays) {
      const img = stageImages.get(name);
      if (img) {
        ctx.globalAlpha = 0.6;
        ctx.drawImage(img, t.panX, t.panY, img.width * t.zoom, img.height * t.zoom);
        ctx.globalAlpha = 1.0;
      }
    }
    for (const seg of state.segments) {
      ctx.strokeStyle = "#ff1744";
      ctx.beginPath();
      seg.pathPixels.forEach(([x, y], i) => {
        const p = imageToCanvas(t, x + 0.5, y + 0.5);
        if (i === 0) ctx.moveTo(p.x, p.y);
        else ctx.lineTo(p.x, p.y);
      });
      ctx.stroke();
    }
    if (state.pendingClick !== null) {
      const p = imageToCanvas(t, state.pendingClick.x, state.pendingClick.y);
      ctx.strokeStyle = "#ffd600";
      ctx.strokeRect(p.x, p.y, t.zoom, t.zoom);
    }
  }

  function loadStage(name: string): void {
    if (state.sessionId === null || stageImages.has(name)) return;
    const img = new Image();
    img.onload = () => {
      stageImages.set(name, img);
      redraw();
    };
    img.src = client.stageUrl(state.sessionId, name);
  }

  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    try {
      const b64 = await fileToBase64(file);
      state.sessionId = await client.createSession(b64);
      const summary = await client.run(state.sessionId);
      state.stages = summary.stages;
      toggles.replaceChildren();
      stageImages.clear();
      for (const name of summary.stages) {
        const btn = doc.createElement("button");
        btn.textContent = name;
        btn.addEventListener("click", () => {
          if (state.toggleOverlay(name)) loadStage(name);
          btn.classList.toggle("active");
          redraw();
        });
        toggles.appendChild(btn);
      }
      baseImage = new Image();
      baseImage.onload = redraw;
      baseImage.src = URL.createObjectURL(file);
    } catch (err) {
      if (err instanceof ServiceError) {
        toasts.appendChild(renderErrorToast(doc, err));
      } else {
        throw err;
      }
    }
  });

  canvas.addEventListener("click", async (ev) => {
    const rect = canvas.getBoundingClientRect();
    await controller.handleClick(ev.clientX - rect.left, ev.clientY - rect.top);
    redraw();
  });

  canvas.addEventListener("contextmenu", (ev) => {
    ev.preventDefault();
    state.cancelClick();
    redraw();
  });

  (doc.getElementById("zoom") as HTMLInputElement).addEventListener("input", (ev) => {
    state.setZoom(Number((ev.target as HTMLInputElement).value));
    redraw();
  });
}

if (typeof document !== "undefined" && document.getElementById("view") !== null) {
  setupViewer(document);
}
