import { defineConfig } from 'vitest/config';

export default defineConfig({
  server: {
    // lets `vite dev` talk to a local graphlens server without CORS fuss
    proxy: {
      '/query': 'http://127.0.0.1:8000',
      '/stats': 'http://127.0.0.1:8000',
      '/nodes': 'http://127.0.0.1:8000',
      '/healthz': 'http://127.0.0.1:8000',
    },
  },
  test: {
    environment: 'happy-dom',
  },
});
