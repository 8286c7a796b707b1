/** Raised for invalid configuration, malformed interchange files, and
 *  preconditions the caller can fix. The CLI turns these into exit code 1. */
export class AdapterError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "AdapterError";
  }
}
