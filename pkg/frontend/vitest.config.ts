import { defineConfig } from "vitest/config"

export default defineConfig({
    test: {
        environment: "jsdom",
        include: ["tests/**/*.test.ts"],
        // the contract suite boots a real attack server
        testTimeout: 60000,
        hookTimeout: 60000,
    },
})
