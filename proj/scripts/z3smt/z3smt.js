#!/usr/bin/env node
// SMT-LIB v2 front end over the z3 WASM build: reads a script on stdin,
// prints the solver's answer on stdout. Drop-in stand-in for `z3 -in`.
'use strict';

const { init } = require('z3-solver');

let data = '';
process.stdin.on('data', (chunk) => { data += chunk; });
process.stdin.on('end', async () => {
  try {
    const { Z3 } = await init();
    const cfg = Z3.mk_config();
    const ctx = Z3.mk_context(cfg);
    const out = await Z3.eval_smtlib2_string(ctx, data);
    process.stdout.write(String(out).trim() + '\n');
    process.exit(0);
  } catch (err) {
    process.stdout.write('unknown\n');
    process.stderr.write('z3smt: ' + String(err && err.message ? err.message : err) + '\n');
    process.exit(1);
  }
});
