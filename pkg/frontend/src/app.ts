import { ApiError, Client } from "./api.js";
import { RankingState } from "./ranking.js";
import { renderError, renderResults, renderTrial } from "./view.js";

/**
 * Session driver. The session id lives in the URL hash so a refresh
 * resumes at the current trial (the next-trial endpoint is idempotent).
 */
export class App {
  private state = new RankingState();

  constructor(
    private readonly client: Client,
    private readonly root: HTMLElement,
    private readonly responderId: string = "browser",
  ) {}

  async start(sessionId: string): Promise<void> {
    window.location.hash = sessionId;
    await this.showNext(sessionId);
  }

  async resume(): Promise<boolean> {
    const sessionId = window.location.hash.replace(/^#/, "");
    if (!sessionId) return false;
    try {
      await this.showNext(sessionId);
      return true;
    } catch (err) {
      if (err instanceof ApiError && err.code === "UnknownSession") {
        window.location.hash = "";
        renderError(this.root, "That session is gone; start a new one.");
        return false;
      }
      throw err;
    }
  }

  private async showNext(sessionId: string): Promise<void> {
    const next = await this.client.nextTrial(sessionId);
    if (next === null) {
      renderResults(this.root, await this.client.results(sessionId));
      return;
    }
    this.state.reset();
    renderTrial(this.root, next, this.state, {
      onSubmit: () => void this.submit(sessionId, next.trial.trialId),
      onStopEarly: () => void this.submit(sessionId, next.trial.trialId),
    });
  }

  private async submit(sessionId: string, trialId: string): Promise<void> {
    try {
      await this.client.submit(
        sessionId,
        this.state.toResponse(trialId, this.responderId),
      );
    } catch (err) {
      if (!(err instanceof ApiError && err.code === "StaleTrial")) {
        throw err;
      }
      // another tab answered first; fall through and show whatever is next
    }
    await this.showNext(sessionId);
  }
}

interface StartFormValues {
  representation: string;
  scoringFn: string;
  detect: boolean;
  boardCount: number;
  seed: number;
}

function readStartForm(doc: Document): StartFormValues {
  const value = (id: string) => (doc.getElementById(id) as HTMLInputElement).value;
  const checked = (id: string) => (doc.getElementById(id) as HTMLInputElement).checked;
  return {
    representation: value("representation"),
    scoringFn: value("scoring"),
    detect: checked("detect"),
    boardCount: parseInt(value("board-count"), 10),
    seed: parseInt(value("seed"), 10),
  };
}

export function bootstrap(doc: Document): void {
  const client = new Client("");
  const root = doc.getElementById("screen") as HTMLElement;
  const app = new App(client, root);

  const form = doc.getElementById("start-form") as HTMLFormElement;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const values = readStartForm(doc);
    void client
      .createSession({
        boardCount: values.boardCount,
        configSet: [
          {
            representation: values.representation,
            scoringFn: values.scoringFn,
            detect: values.detect,
          },
        ],
        seed: values.seed,
      })
      .then((created) => app.start(created.sessionId))
      .catch((err) => renderError(root, String(err)));
  });

  void app.resume();
}
