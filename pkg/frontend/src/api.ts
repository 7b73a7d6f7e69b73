/**
 * Typed client for the synthesis service. The wire schema here is duplicated
 * from the service contract and pinned by a contract test against a recorded
 * response fixture.
 */

export interface Measurement {
  /** Mean F0 in Hz over voiced frames; null when the audio is fully unvoiced. */
  f0_mean: number | null;
  /** Speaking rate in phonemes per second over the active duration. */
  rate: number;
  /** RMS amplitude over the active duration. */
  rms: number;
}

export interface PredictedFactors {
  gender: string;
  pitch: string;
  speed: string;
  volume: string;
  emotion?: string;
}

export interface SynthesizeResponse {
  /** Base64-encoded mono 16 kHz PCM16 RIFF WAV. */
  audio: string;
  measurement: Measurement;
  predicted_factors: PredictedFactors;
  timing_ms: Record<string, number>;
}

export interface HealthResponse {
  status: string;
  model_version: string | null;
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
  }
}

export class SynthesisClient {
  constructor(
    readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  async health(): Promise<HealthResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/health`);
    if (!response.ok) {
      throw new ApiError(response.status, `health check failed (${response.status})`);
    }
    return (await response.json()) as HealthResponse;
  }

  async synthesize(stylePrompt: string, contentPrompt: string): Promise<SynthesizeResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/synthesize`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ style_prompt: stylePrompt, content_prompt: contentPrompt }),
    });
    if (!response.ok) {
      let detail = `request failed (${response.status})`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        /* non-JSON error body; keep the generic message */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as SynthesizeResponse;
  }
}

/** Decode the response audio into a Blob playable by an <audio> element. */
export function audioBlob(response: SynthesizeResponse): Blob {
  const raw = atob(response.audio);
  const bytes = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) {
    bytes[i] = raw.charCodeAt(i);
  }
  return new Blob([bytes], { type: "audio/wav" });
}
