import { ApiError } from "./api.js";

function inputLabel(input: string): string {
  if (input === "source") return "source";
  if (input === "reference") return "style";
  if (input === "reference2") return "second style";
  return input;
}

/**
 * Turn a failed request into one sentence a person can act on, keyed off
 * the server's error category. Unknowns get a generic message rather
 * than leaking internals.
 */
export function guidanceFor(err: unknown): string {
  if (err instanceof ApiError) {
    switch (err.category) {
      case "geometry": {
        const input = typeof err.detail.input === "string" ? err.detail.input : "uploaded";
        return `No face was detected in the ${inputLabel(input)} image. Use a sharper, front-facing photo.`;
      }
      case "model":
        return "The server has no trained models loaded yet. Ask whoever runs it to install them, then retry.";
      case "style":
        return "That style is gone from the server. Refresh the style list and pick another.";
      case "result":
        return "That result has expired or never existed. Run the transfer again.";
      case "data":
        return "Stored style data failed its integrity check. Re-upload the style.";
      case "request":
        return `The server rejected the request: ${err.message}`;
      default:
        return `The server reported an error: ${err.message}`;
    }
  }
  if (err instanceof TypeError) {
    return "Could not reach the try-on service. Check that it is running and the address is right.";
  }
  return "Something unexpected went wrong. Try again.";
}
