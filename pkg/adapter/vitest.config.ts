import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    // the acceptance suite trains an encoder and drives the full consumer
    // pipeline, so individual tests can legitimately take tens of seconds
    testTimeout: 180_000,
    hookTimeout: 180_000,
  },
});
